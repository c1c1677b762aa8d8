import math
from collections import defaultdict


def running_quantity(messages):
    """Compute the running total of message quantity values."""
    totals = []
    current = 0
    for message in messages:
        current += message.quantity
        totals.append(current)
    return totals


def normalize_duration(cities):
    """Scale every city <b>duration</b> into the unit interval.
    """
    values = [city.duration for city in cities]
    low, high = min(values), max(values)
    span = high - low or 1
    for city in cities:
        city.duration = (city.duration - low) / span
    return cities


def normalize_distance(devices):
    # walk the devices once
    values = [device.distance for device in devices]
    low, high = min(values), max(values)
    span = high - low or 1
    for device in devices:
        device.distance = (device.distance - low) / span
    return devices


def find_min_distance_message(messages):
    """Find the message with the lowest distance."""
    lowest = messages[0]
    for message in messages[1:]:
        if message.distance < lowest.distance:
            lowest = message
    return lowest


def running_priority(vehicles):
    """Compute the running total of vehicle priority values.

    :param vehicles: the vehicles to inspect
    """
    totals = []
    current = 0
    for vehicle in vehicles:
        current += vehicle.priority
        totals.append(current)
    return totals


class ShipmentRegistry:
    """Keep track of shipments by email."""

    def __init__(self):
        """Create an empty registry of shipments."""
        self.items = {}
        self.total = 0

    def add(self, shipment):
        """Register a new shipment in the registry."""
        self.items[shipment.email] = shipment
        self.total += shipment.volume

    def remove(self, email):
        """Remove the shipment with the given email."""
        shipment = self.items.pop(email, None)
        if shipment is not None:
            self.total -= shipment.volume
        return shipment

    def get_volume(self):
        """Return the tracked volume."""
        return self.total
