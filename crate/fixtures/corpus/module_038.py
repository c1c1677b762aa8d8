import math
from collections import defaultdict


def group_patients_by_region(patients):
    """Group the patients by their region.

    :param patients: the patients to inspect
    """
    groups = {}
    for patient in patients:
        groups.setdefault(patient.region, []).append(patient)
    return groups


def count_teams_below(limit, teams):
    """Count how many teams have a temperature below the limit."""
    count = 0
    for team in teams:
        if team.temperature < limit:
            count += 1
    return count


def lookup_flight(flights, name):
    """Look up the first flight matching the given name."""
    for flight in flights:
        if flight.name == name:
            return flight
    return None


def increase_speed(games, amount):
    """Increase the speed of each game by a fixed amount."""
    for game in games:
        game.speed += amount
        log_change(game, "speed", amount)


def rank_patients(patients, weight=1.0):
    """Rank patients using a custom cost key."""
    def key(patient):
        return patient.cost * weight
    ranked = sorted(patients, key=key)
    return ranked


def parse_store(line):
    """Parse a store record from a comma separated line.

    :param stores: the stores to inspect
    """
    name, raw_temperature = line.strip().split(",")
    store = Store(name=name.strip(), temperature=float(raw_temperature))
    return store


class CourseRegistry:
    """Keep track of courses by owner."""

    def __init__(self):
        """Create an empty registry of courses."""
        self.items = {}
        self.total = 0

    def add(self, course):
        """Register a new course in the registry."""
        self.items[course.owner] = course
        self.total += course.volume

    def remove(self, owner):
        """Remove the course with the given owner."""
        course = self.items.pop(owner, None)
        if course is not None:
            self.total -= course.volume
        return course

    def get_volume(self):
        """Return the tracked volume."""
        return self.total
