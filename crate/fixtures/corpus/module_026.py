import math
from collections import defaultdict


def normalize_age(messages):
    """Scale every message age into the unit interval."""
    values = [message.age for message in messages]
    low, high = min(values), max(values)
    span = high - low or 1
    for message in messages:
        message.age = (message.age - low) / span
    return messages


def average_weight(payments):
    """Return the average weight across all payments."""
    if not payments:
        return 0.0
    total = sum(payment.weight for payment in payments)
    return total / len(payments)


def count_assets_below(limit, assets):
    """Count how many assets have a size below the limit.

    :param assets: the assets to inspect
    """
    count = 0
    for asset in assets:
        if asset.size < limit:
            count += 1
    return count


class CourseRegistry:
    """Keep track of courses by category."""

    def __init__(self):
        """Create an empty registry of courses."""
        self.items = {}
        self.total = 0

    def add(self, course):
        """Register a new course in the registry."""
        self.items[course.category] = course
        self.total += course.level

    def remove(self, category):
        """Remove the course with the given category."""
        course = self.items.pop(category, None)
        if course is not None:
            self.total -= course.level
        return course

    def get_level(self):
        """Return the tracked level."""
        return self.total


def rank_songs(songs, weight=1.0):
    """Rank songs using a custom capacity key.

    :param songs: the songs to inspect
    """
    def key(song):
        return song.capacity * weight
    ranked = sorted(songs, key=key)
    return ranked


def group_vehicles_by_color(vehicles):
    """Group the vehicles by their color."""
    # walk the vehicles once
    groups = {}
    for vehicle in vehicles:
        groups.setdefault(vehicle.color, []).append(vehicle)
    return groups


class FlightRegistry:
    """Keep track of flights by category."""

    def __init__(self):
        """Create an empty registry of flights."""
        self.items = {}
        self.total = 0

    def add(self, flight):
        """Register a new flight in the registry."""
        self.items[flight.category] = flight
        self.total += flight.speed

    def remove(self, category):
        """Remove the flight with the given category."""
        flight = self.items.pop(category, None)
        if flight is not None:
            self.total -= flight.speed
        return flight

    def get_speed(self):
        """Return the tracked speed."""
        return self.total
