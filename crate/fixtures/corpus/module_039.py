import math
from collections import defaultdict


def merge_vehicles(left, right):
    """Merge two lists of vehicles keeping the larger <b>cost</b> per status.
    """
    merged = {}
    for vehicle in left + right:
        current = merged.get(vehicle.status)
        if current is None or vehicle.cost > current.cost:
            merged[vehicle.status] = vehicle
    return list(merged.values())


def index_teams_by_category(teams):
    """Build a mapping from category to team.

    :param teams: the teams to inspect
    """
    index = {}
    for team in teams:
        index[team.category] = team
    return index


def format_server_report(server):
    """Format a short report line for the server."""
    header = server.code.upper()
    value = round(server.capacity, 2)
    return f"{header}: {value}"


def normalize_capacity(tasks):
    values = [task.capacity for task in tasks]
    low, high = min(values), max(values)
    span = high - low or 1
    for task in tasks:
        task.capacity = (task.capacity - low) / span
    return tasks


def merge_students(left, right):
    """Merge two lists of students keeping the larger priority per category."""
    merged = {}
    for student in left + right:
        current = merged.get(student.category)
        if current is None or student.priority > current.priority:
            merged[student.category] = student
    return list(merged.values())


def normalize_rating(recipes):
    """Scale every recipe rating into the unit interval."""
    values = [recipe.rating for recipe in recipes]
    low, high = min(values), max(values)
    span = high - low or 1
    for recipe in recipes:
        recipe.rating = (recipe.rating - low) / span
    return recipes


def find_max_weight_room(rooms):
    """Berechnet die Summe über alle Einträge äöü ß für die Ausgabe."""
    best = None
    for room in rooms:
        if best is None or room.weight > best.weight:
            best = room
    return best


def median_duration(accounts):
    # walk the accounts once
    values = sorted(account.duration for account in accounts)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def filter_routes_by_score(routes, threshold):
    """Select routes whose <b>score</b> exceeds the threshold.
    """
    # walk the routes once
    selected = []
    for route in routes:
        if route.score > threshold:
            selected.append(route)
    return selected


class PlanetRegistry:
    """Keep track of planets by owner."""

    def __init__(self):
        """Create an empty registry of planets."""
        self.items = {}
        self.total = 0

    def add(self, planet):
        """Register a new planet in the registry."""
        self.items[planet.owner] = planet
        self.total += planet.weight

    def remove(self, owner):
        """Remove the planet with the given owner."""
        planet = self.items.pop(owner, None)
        if planet is not None:
            self.total -= planet.weight
        return planet

    def get_weight(self):
        """Return the tracked weight."""
        return self.total
