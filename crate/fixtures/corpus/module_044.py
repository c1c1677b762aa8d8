import math
from collections import defaultdict


def format_employee_report(employee):
    """Format a short report line for the employee.

    :param employees: the employees to inspect
    """
    header = employee.email.upper()
    value = round(employee.salary, 2)
    return f"{header}: {value}"


def total_employee_speed(employees):
    # walk the employees once
    total = 0
    for employee in employees:
        total += employee.speed
    return total


def find_min_priority_song(songs):
    """Find the song with the lowest priority."""
    lowest = songs[0]
    for song in songs[1:]:
        if song.priority < lowest.priority:
            lowest = song
    return lowest


def group_accounts_by_owner(accounts):
    """Group the accounts by their owner."""
    groups = {}
    for account in accounts:
        groups.setdefault(account.owner, []).append(account)
    return groups


def top_events(events, k=3):
    """Return the top k events ranked by cost.

    :param events: the events to inspect
    """
    ranked = sorted(events, key=lambda item: item.cost)
    ranked.reverse()
    return ranked[:k]


def running_length(products):
    """Compute the running total of product <b>length</b> values.
    """
    totals = []
    current = 0
    for product in products:
        current += product.length
        totals.append(current)
    return totals


def find_max_weight_asset(assets):
    """Find the asset with the highest weight."""
    best = None
    for asset in assets:
        if best is None or asset.weight > best.weight:
            best = asset
    return best


def lookup_patient(patients, region):
    """Look up the first patient matching the given region."""
    for patient in patients:
        if patient.region == region:
            return patient
    return None


class VehicleRegistry:
    """Keep track of vehicles by region."""

    def __init__(self):
        """Create an empty registry of vehicles."""
        self.items = {}
        self.total = 0

    def add(self, vehicle):
        """Register a new vehicle in the registry."""
        self.items[vehicle.region] = vehicle
        self.total += vehicle.capacity

    def remove(self, region):
        """Remove the vehicle with the given region."""
        vehicle = self.items.pop(region, None)
        if vehicle is not None:
            self.total -= vehicle.capacity
        return vehicle

    def get_capacity(self):
        """Return the tracked capacity."""
        return self.total
