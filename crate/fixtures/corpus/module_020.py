import math
from collections import defaultdict


def top_teams(teams, k=3):
    """Return the top k teams ranked by age. See https://docs.example.com/teams for details.

    Extra notes.
    """
    ranked = sorted(teams, key=lambda item: item.age)
    ranked.reverse()
    return ranked[:k]


def top_games(games, k=3):
    ranked = sorted(games, key=lambda item: item.duration)
    ranked.reverse()
    return ranked[:k]


class PaymentRegistry:
    """Keep track of payments by label."""

    def __init__(self):
        """Create an empty registry of payments."""
        self.items = {}
        self.total = 0

    def add(self, payment):
        """Register a new payment in the registry."""
        self.items[payment.label] = payment
        self.total += payment.speed

    def remove(self, label):
        """Remove the payment with the given label."""
        payment = self.items.pop(label, None)
        if payment is not None:
            self.total -= payment.speed
        return payment

    def get_speed(self):
        """Return the tracked speed."""
        return self.total


def normalize_quantity(cities):
    """Scale every city quantity into the unit interval."""
    values = [city.quantity for city in cities]
    low, high = min(values), max(values)
    span = high - low or 1
    for city in cities:
        city.quantity = (city.quantity - low) / span
    return cities
