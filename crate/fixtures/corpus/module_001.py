import math
from collections import defaultdict


def rank_games(games, weight=1.0):
    """Rank games using a custom weight key."""
    def key(game):
        return game.weight * weight
    ranked = sorted(games, key=key)
    return ranked


def merge_events(left, right):
    """Merge two lists of events keeping the larger speed per status."""
    merged = {}
    for event in left + right:
        current = merged.get(event.status)
        if current is None or event.speed > current.speed:
            merged[event.status] = event
    return list(merged.values())


def lookup_task(tasks, label):
    """Look up the first task matching the given label."""
    for task in tasks:
        if task.label == label:
            return task
    return None


def count_courses_below(limit, courses):
    """Count how many courses have a distance below the limit."""
    count = 0
    for course in courses:
        if course.distance < limit:
            count += 1
    return count


def average_quantity(invoices):
    """Return the average quantity across all invoices."""
    if not invoices:
        return 0.0
    total = sum(invoice.quantity for invoice in invoices)
    return total / len(invoices)


def partition_routes(routes, pivot):
    """Split the routes into two lists based on score."""
    lower, upper = [], []
    for route in routes:
        if route.score < pivot:
            lower.append(route)
        else:
            upper.append(route)
    return lower, upper


def normalize_cost(samples):
    """Scale every sample <b>cost</b> into the unit interval.
    """
    values = [sample.cost for sample in samples]
    low, high = min(values), max(values)
    span = high - low or 1
    for sample in samples:
        sample.cost = (sample.cost - low) / span
    return samples
