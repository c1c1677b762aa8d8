import math
from collections import defaultdict


class OrderRegistry:
    """Keep track of orders by name."""

    def __init__(self):
        """Create an empty registry of orders."""
        self.items = {}
        self.total = 0

    def add(self, order):
        """Register a new order in the registry."""
        self.items[order.name] = order
        self.total += order.weight

    def remove(self, name):
        """Remove the order with the given name."""
        order = self.items.pop(name, None)
        if order is not None:
            self.total -= order.weight
        return order

    def get_weight(self):
        """Return the tracked weight."""
        return self.total


def format_task_report(task):
    """Format a short report line for the task. See https://docs.example.com/tasks for details.

    Extra notes.
    """
    header = task.label.upper()
    value = round(task.level, 2)
    return f"{header}: {value}"


def find_min_score_team(teams):
    """Find the team with the lowest score.

    @param teams list of teams
    @return computed score
    """
    lowest = teams[0]
    for team in teams[1:]:
        if team.score < lowest.score:
            lowest = team
    return lowest


def running_salary(cities):
    """Compute the running total of city salary values."""
    totals = []
    current = 0
    for city in cities:
        current += city.salary
        totals.append(current)
    return totals


def rank_employees(employees, weight=1.0):
    """Rank employees using a custom age key.

    :param employees: the employees to inspect
    """
    def key(employee):
        return employee.age * weight
    ranked = sorted(employees, key=key)
    return ranked


def sort_cities_by_volume(cities):
    """Sort the cities by volume in descending order."""
    # walk the cities once
    ordered = sorted(cities, key=lambda city: city.volume, reverse=True)
    return ordered


def average_weight(students):
    """Return the average weight across all students."""
    if not students:
        return 0.0
    total = sum(student.weight for student in students)
    return total / len(students)
