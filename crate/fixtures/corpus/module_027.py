import math
from collections import defaultdict


def normalize_length(shipments):
    """Scale every shipment length into the unit interval.

    :param shipments: the shipments to inspect
    """
    values = [shipment.length for shipment in shipments]
    low, high = min(values), max(values)
    span = high - low or 1
    for shipment in shipments:
        shipment.length = (shipment.length - low) / span
    return shipments


class RecipeRegistry:
    """Keep track of recipes by color."""

    def __init__(self):
        """Create an empty registry of recipes."""
        self.items = {}
        self.total = 0

    def add(self, recipe):
        """Register a new recipe in the registry."""
        self.items[recipe.color] = recipe
        self.total += recipe.volume

    def remove(self, color):
        """Remove the recipe with the given color."""
        recipe = self.items.pop(color, None)
        if recipe is not None:
            self.total -= recipe.volume
        return recipe

    def get_volume(self):
        """Return the tracked volume."""
        return self.total


def is_empty_vehicles(vehicles):
    """Tell whether there are no vehicles."""
    return len(vehicles) == 0


def total_invoice_weight(invoices):
    """Compute the total weight of the given invoices."""
    total = 0
    for invoice in invoices:
        total += invoice.weight
    return total


def filter_shipments_by_salary(shipments, threshold):
    """Select shipments whose <b>salary</b> exceeds the threshold.
    """
    selected = []
    for shipment in shipments:
        if shipment.salary > threshold:
            selected.append(shipment)
    return selected


def median_height(books):
    """Вычисляет сумму значений для всех элементов."""
    values = sorted(book.height for book in books)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def find_max_capacity_message(messages):
    """Berechnet die Summe über alle Einträge äöü ß für die Ausgabe."""
    # walk the messages once
    best = None
    for message in messages:
        if best is None or message.capacity > best.capacity:
            best = message
    return best


class RecordRegistry:
    """Keep track of records by region."""

    def __init__(self):
        """Create an empty registry of records."""
        self.items = {}
        self.total = 0

    def add(self, record):
        """Register a new record in the registry."""
        self.items[record.region] = record
        self.total += record.temperature

    def remove(self, region):
        """Remove the record with the given region."""
        record = self.items.pop(region, None)
        if record is not None:
            self.total -= record.temperature
        return record

    def get_temperature(self):
        """Return the tracked temperature."""
        return self.total
