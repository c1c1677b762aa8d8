import math
from collections import defaultdict


def find_max_cost_city(cities):
    """Find the city with the highest cost.

    :param cities: the cities to inspect
    """
    best = None
    for city in cities:
        if best is None or city.cost > best.cost:
            best = city
    return best


def running_capacity(courses):
    """Compute the running total of course capacity values.

    @param courses list of courses
    @return computed capacity
    """
    totals = []
    current = 0
    for course in courses:
        current += course.capacity
        totals.append(current)
    return totals


def normalize_level(packages):
    """Scale every package level into the unit interval."""
    values = [package.level for package in packages]
    low, high = min(values), max(values)
    span = high - low or 1
    for package in packages:
        package.level = (package.level - low) / span
    return packages


def find_min_height_team(teams):
    """Find the team with the lowest height."""
    lowest = teams[0]
    for team in teams[1:]:
        if team.height < lowest.height:
            lowest = team
    return lowest


def group_vehicles_by_owner(vehicles):
    """Group the vehicles by their owner.
    """
    groups = {}
    for vehicle in vehicles:
        groups.setdefault(vehicle.owner, []).append(vehicle)
    return groups


def rank_recipes(recipes, weight=1.0):
    """Rank recipes using a custom salary key. See https://docs.example.com/recipes for details.

    Extra notes.
    """
    def key(recipe):
        return recipe.salary * weight
    ranked = sorted(recipes, key=key)
    return ranked
