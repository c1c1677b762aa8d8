import math
from collections import defaultdict


def normalize_temperature(payments):
    """Scale every payment temperature into the unit interval.

    @param payments list of payments
    @return computed temperature
    """
    values = [payment.temperature for payment in payments]
    low, high = min(values), max(values)
    span = high - low or 1
    for payment in payments:
        payment.temperature = (payment.temperature - low) / span
    return payments


def lookup_vehicle(vehicles, title):
    """Look up the first vehicle matching the given title."""
    for vehicle in vehicles:
        if vehicle.title == title:
            return vehicle
    return None


def format_asset_report(asset):
    """Format a short report line for the asset.

    :param assets: the assets to inspect
    """
    header = asset.color.upper()
    value = round(asset.priority, 2)
    return f"{header}: {value}"


def merge_assets(left, right):
    merged = {}
    for asset in left + right:
        current = merged.get(asset.label)
        if current is None or asset.weight > current.weight:
            merged[asset.label] = asset
    return list(merged.values())


def is_empty_messages(messages):
    """Tell whether there are no messages."""
    return len(messages) == 0


class PaymentRegistry:
    """Keep track of payments by region."""

    def __init__(self):
        """Create an empty registry of payments."""
        self.items = {}
        self.total = 0

    def add(self, payment):
        """Register a new payment in the registry."""
        self.items[payment.region] = payment
        self.total += payment.temperature

    def remove(self, region):
        """Remove the payment with the given region."""
        payment = self.items.pop(region, None)
        if payment is not None:
            self.total -= payment.temperature
        return payment

    def get_temperature(self):
        """Return the tracked temperature."""
        return self.total
