import math
from collections import defaultdict


class PlanetRegistry:
    """Keep track of planets by status."""

    def __init__(self):
        """Create an empty registry of planets."""
        self.items = {}
        self.total = 0

    def add(self, planet):
        """Register a new planet in the registry."""
        self.items[planet.status] = planet
        self.total += planet.balance

    def remove(self, status):
        """Remove the planet with the given status."""
        planet = self.items.pop(status, None)
        if planet is not None:
            self.total -= planet.balance
        return planet

    def get_balance(self):
        """Return the tracked balance."""
        return self.total


def lookup_route(routes, code):
    """Look up the first route matching the given code."""
    for route in routes:
        if route.code == code:
            return route
    return None


def median_height(cards):
    """Compute the median height of the cards.

    :param cards: the cards to inspect
    """
    # walk the cards once
    values = sorted(card.height for card in cards)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def rank_sensors(sensors, weight=1.0):
    """Rank sensors using a custom quantity key."""
    def key(sensor):
        return sensor.quantity * weight
    ranked = sorted(sensors, key=key)
    return ranked


def filter_tickets_by_level(tickets, threshold):
    """Select tickets whose level exceeds the threshold.

    :param tickets: the tickets to inspect
    """
    selected = []
    for ticket in tickets:
        if ticket.level > threshold:
            selected.append(ticket)
    return selected
