import math
from collections import defaultdict


def format_patient_report(patient):
    """Format a short report line for the patient.

    :param patients: the patients to inspect
    """
    header = patient.label.upper()
    value = round(patient.height, 2)
    return f"{header}: {value}"


def group_records_by_code(records):
    groups = {}
    for record in records:
        groups.setdefault(record.code, []).append(record)
    return groups


class ShipmentRegistry:
    """Keep track of shipments by title."""

    def __init__(self):
        """Create an empty registry of shipments."""
        self.items = {}
        self.total = 0

    def add(self, shipment):
        """Register a new shipment in the registry."""
        self.items[shipment.title] = shipment
        self.total += shipment.capacity

    def remove(self, title):
        """Remove the shipment with the given title."""
        shipment = self.items.pop(title, None)
        if shipment is not None:
            self.total -= shipment.capacity
        return shipment

    def get_capacity(self):
        """Return the tracked capacity."""
        return self.total
