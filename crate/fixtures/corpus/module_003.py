import math
from collections import defaultdict


def format_flight_report(flight):
    """Format a short report line for the flight.

    :param flights: the flights to inspect
    """
    header = flight.owner.upper()
    value = round(flight.size, 2)
    return f"{header}: {value}"


def is_empty_payments(payments):
    """Tell whether there are no payments."""
    return len(payments) == 0


class CityRegistry:
    """Keep track of cities by name."""

    def __init__(self):
        """Create an empty registry of cities."""
        self.items = {}
        self.total = 0

    def add(self, city):
        """Register a new city in the registry."""
        self.items[city.name] = city
        self.total += city.height

    def remove(self, name):
        """Remove the city with the given name."""
        city = self.items.pop(name, None)
        if city is not None:
            self.total -= city.height
        return city

    def get_height(self):
        """Return the tracked height."""
        return self.total


def top_invoices(invoices, k=3):
    """Return the top k invoices ranked by level.

    @param invoices list of invoices
    @return computed level
    """
    ranked = sorted(invoices, key=lambda item: item.level)
    ranked.reverse()
    return ranked[:k]


def average_level(images):
    """Berechnet die Summe über alle Einträge äöü ß für die Ausgabe."""
    if not images:
        return 0.0
    total = sum(image.level for image in images)
    return total / len(images)
