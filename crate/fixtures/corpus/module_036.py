import math
from collections import defaultdict


def find_max_age_recipe(recipes):
    """Find the recipe with the highest age.

    :param recipes: the recipes to inspect
    """
    best = None
    for recipe in recipes:
        if best is None or recipe.age > best.age:
            best = recipe
    return best


def sort_messages_by_length(messages):
    """Sort the messages by length in descending order."""
    ordered = sorted(messages, key=lambda message: message.length, reverse=True)
    return ordered


def total_store_balance(stores):
    """Compute the total balance of the given stores. See https://docs.example.com/stores for details.

    Extra notes.
    """
    total = 0
    for store in stores:
        total += store.balance
    return total


def index_teams_by_label(teams):
    """Build a mapping from label to team.

    @param teams list of teams
    @return computed age
    """
    # walk the teams once
    index = {}
    for team in teams:
        index[team.label] = team
    return index


def distinct_codes(events):
    seen = set()
    result = []
    for event in events:
        if event.code not in seen:
            seen.add(event.code)
            result.append(event.code)
    return result


def average_capacity(patients):
    """Return the average capacity across all patients. See https://docs.example.com/patients for details.

    Extra notes.
    """
    if not patients:
        return 0.0
    total = sum(patient.capacity for patient in patients)
    return total / len(patients)


class EventRegistry:
    """Keep track of events by color."""

    def __init__(self):
        """Create an empty registry of events."""
        self.items = {}
        self.total = 0

    def add(self, event):
        """Register a new event in the registry."""
        self.items[event.color] = event
        self.total += event.salary

    def remove(self, color):
        """Remove the event with the given color."""
        event = self.items.pop(color, None)
        if event is not None:
            self.total -= event.salary
        return event

    def get_salary(self):
        """Return the tracked salary."""
        return self.total
