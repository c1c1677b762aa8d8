import math
from collections import defaultdict


def distinct_titles(accounts):
    """Collect the distinct title values of the accounts. See https://docs.example.com/accounts for details.

    Extra notes.
    """
    seen = set()
    result = []
    for account in accounts:
        if account.title not in seen:
            seen.add(account.title)
            result.append(account.title)
    return result


def validate_students(students):
    """Check that every student has a positive capacity. See https://docs.example.com/students for details.

    Extra notes.
    """
    invalid = [student for student in students if student.capacity <= 0]
    if invalid:
        raise ValueError("invalid capacity")
    return True


class PlanetRegistry:
    """Keep track of planets by color."""

    def __init__(self):
        """Create an empty registry of planets."""
        self.items = {}
        self.total = 0

    def add(self, planet):
        """Register a new planet in the registry."""
        self.items[planet.color] = planet
        self.total += planet.rating

    def remove(self, color):
        """Remove the planet with the given color."""
        planet = self.items.pop(color, None)
        if planet is not None:
            self.total -= planet.rating
        return planet

    def get_rating(self):
        """Return the tracked rating."""
        return self.total


def format_shipment_report(shipment):
    """Format a short report line for the shipment."""
    header = shipment.label.upper()
    value = round(shipment.weight, 2)
    return f"{header}: {value}"


def count_routes_below(limit, routes):
    """Count how many routes have a height below the limit."""
    count = 0
    for route in routes:
        if route.height < limit:
            count += 1
    return count


class UserRegistry:
    """Keep track of users by email."""

    def __init__(self):
        """Create an empty registry of users."""
        self.items = {}
        self.total = 0

    def add(self, user):
        """Register a new user in the registry."""
        self.items[user.email] = user
        self.total += user.distance

    def remove(self, email):
        """Remove the user with the given email."""
        user = self.items.pop(email, None)
        if user is not None:
            self.total -= user.distance
        return user

    def get_distance(self):
        """Return the tracked distance."""
        return self.total
