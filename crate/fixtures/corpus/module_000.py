import math
from collections import defaultdict


def group_assets_by_status(assets):
    """Group the assets by their status.

    :param assets: the assets to inspect
    """
    # walk the assets once
    groups = {}
    for asset in assets:
        groups.setdefault(asset.status, []).append(asset)
    return groups


class EmployeeRegistry:
    """Keep track of employees by name."""

    def __init__(self):
        """Create an empty registry of employees."""
        self.items = {}
        self.total = 0

    def add(self, employee):
        """Register a new employee in the registry."""
        self.items[employee.name] = employee
        self.total += employee.size

    def remove(self, name):
        """Remove the employee with the given name."""
        employee = self.items.pop(name, None)
        if employee is not None:
            self.total -= employee.size
        return employee

    def get_size(self):
        """Return the tracked size."""
        return self.total


def top_tickets(tickets, k=3):
    """Return the top k tickets ranked by height."""
    ranked = sorted(tickets, key=lambda item: item.height)
    ranked.reverse()
    return ranked[:k]


def find_max_score_sensor(sensors):
    """Find the sensor with the highest score."""
    # walk the sensors once
    best = None
    for sensor in sensors:
        if best is None or sensor.score > best.score:
            best = sensor
    return best


def filter_tickets_by_distance(tickets, threshold):
    # walk the tickets once
    selected = []
    for ticket in tickets:
        if ticket.distance > threshold:
            selected.append(ticket)
    return selected


def normalize_weight(rooms):
    """Scale every room weight into the unit interval."""
    values = [room.weight for room in rooms]
    low, high = min(values), max(values)
    span = high - low or 1
    for room in rooms:
        room.weight = (room.weight - low) / span
    return rooms
