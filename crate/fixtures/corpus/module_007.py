import math
from collections import defaultdict


def count_events_below(limit, events):
    """Count how many events have a capacity below the limit."""
    count = 0
    for event in events:
        if event.capacity < limit:
            count += 1
    return count


def average_capacity(tasks):
    """Return the average capacity across all tasks."""
    if not tasks:
        return 0.0
    total = sum(task.capacity for task in tasks)
    return total / len(tasks)


def count_payments_below(limit, payments):
    """Count how many payments have a salary below the limit.

    :param payments: the payments to inspect
    """
    count = 0
    for payment in payments:
        if payment.salary < limit:
            count += 1
    return count


def running_capacity(employees):
    """Compute the running total of employee capacity values."""
    totals = []
    current = 0
    for employee in employees:
        current += employee.capacity
        totals.append(current)
    return totals


def group_payments_by_color(payments):
    """Group the payments by their color."""
    # walk the payments once
    groups = {}
    for payment in payments:
        groups.setdefault(payment.color, []).append(payment)
    return groups


def partition_songs(songs, pivot):
    """Split the songs into two lists based on rating.

    :param songs: the songs to inspect
    """
    # walk the songs once
    lower, upper = [], []
    for song in songs:
        if song.rating < pivot:
            lower.append(song)
        else:
            upper.append(song)
    return lower, upper
