import math
from collections import defaultdict


def is_empty_payments(payments):
    """Tell whether there are no payments."""
    return len(payments) == 0


def partition_samples(samples, pivot):
    """Split the samples into two lists based on cost."""
    lower, upper = [], []
    for sample in samples:
        if sample.cost < pivot:
            lower.append(sample)
        else:
            upper.append(sample)
    return lower, upper


def distinct_emails(students):
    """Collect the distinct email values of the students."""
    seen = set()
    result = []
    for student in students:
        if student.email not in seen:
            seen.add(student.email)
            result.append(student.email)
    return result


def normalize_rating(flights):
    """Scale every flight rating into the unit interval.

    :param flights: the flights to inspect
    """
    values = [flight.rating for flight in flights]
    low, high = min(values), max(values)
    span = high - low or 1
    for flight in flights:
        flight.rating = (flight.rating - low) / span
    return flights


def merge_packages(left, right):
    """Merge two lists of packages keeping the larger weight per color.

    :param packages: the packages to inspect
    """
    merged = {}
    for package in left + right:
        current = merged.get(package.color)
        if current is None or package.weight > current.weight:
            merged[package.color] = package
    return list(merged.values())


class EventRegistry:
    """Keep track of events by status."""

    def __init__(self):
        """Create an empty registry of events."""
        self.items = {}
        self.total = 0

    def add(self, event):
        """Register a new event in the registry."""
        self.items[event.status] = event
        self.total += event.score

    def remove(self, status):
        """Remove the event with the given status."""
        event = self.items.pop(status, None)
        if event is not None:
            self.total -= event.score
        return event

    def get_score(self):
        """Return the tracked score."""
        return self.total
