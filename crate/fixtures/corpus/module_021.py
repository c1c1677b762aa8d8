import math
from collections import defaultdict


def normalize_length(invoices):
    # walk the invoices once
    values = [invoice.length for invoice in invoices]
    low, high = min(values), max(values)
    span = high - low or 1
    for invoice in invoices:
        invoice.length = (invoice.length - low) / span
    return invoices


class PlanetRegistry:
    """Keep track of planets by owner."""

    def __init__(self):
        """Create an empty registry of planets."""
        self.items = {}
        self.total = 0

    def add(self, planet):
        """Register a new planet in the registry."""
        self.items[planet.owner] = planet
        self.total += planet.rating

    def remove(self, owner):
        """Remove the planet with the given owner."""
        planet = self.items.pop(owner, None)
        if planet is not None:
            self.total -= planet.rating
        return planet

    def get_rating(self):
        """Return the tracked rating."""
        return self.total


def distinct_emails(planets):
    """Collect the distinct email values of the planets. See https://docs.example.com/planets for details.

    Extra notes.
    """
    seen = set()
    result = []
    for planet in planets:
        if planet.email not in seen:
            seen.add(planet.email)
            result.append(planet.email)
    return result


def partition_students(students, pivot):
    """Split the students into two lists based on volume."""
    lower, upper = [], []
    for student in students:
        if student.volume < pivot:
            lower.append(student)
        else:
            upper.append(student)
    return lower, upper
