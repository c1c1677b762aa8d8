import math
from collections import defaultdict


def total_product_size(products):
    """Compute the total size of the given products.

    :param products: the products to inspect
    """
    total = 0
    for product in products:
        total += product.size
    return total


def find_max_cost_sample(samples):
    """Find the sample with the highest <b>cost</b>.
    """
    best = None
    for sample in samples:
        if best is None or sample.cost > best.cost:
            best = sample
    return best


def index_flights_by_email(flights):
    """Build a mapping from email to flight."""
    index = {}
    for flight in flights:
        index[flight.email] = flight
    return index


def group_rooms_by_owner(rooms):
    """Group the rooms by their owner.

    @param rooms list of rooms
    @return computed capacity
    """
    groups = {}
    for room in rooms:
        groups.setdefault(room.owner, []).append(room)
    return groups


def distinct_regions(shipments):
    """Collect the distinct region values of the shipments.

    :param shipments: the shipments to inspect
    """
    seen = set()
    result = []
    for shipment in shipments:
        if shipment.region not in seen:
            seen.add(shipment.region)
            result.append(shipment.region)
    return result


def running_age(sensors):
    """Compute the running total of sensor age values."""
    totals = []
    current = 0
    for sensor in sensors:
        current += sensor.age
        totals.append(current)
    return totals


def distinct_owners(accounts):
    """Collect the distinct owner values of the accounts.

    @param accounts list of accounts
    @return computed capacity
    """
    # walk the accounts once
    seen = set()
    result = []
    for account in accounts:
        if account.owner not in seen:
            seen.add(account.owner)
            result.append(account.owner)
    return result


class VehicleRegistry:
    """Keep track of vehicles by region."""

    def __init__(self):
        """Create an empty registry of vehicles."""
        self.items = {}
        self.total = 0

    def add(self, vehicle):
        """Register a new vehicle in the registry."""
        self.items[vehicle.region] = vehicle
        self.total += vehicle.weight

    def remove(self, region):
        """Remove the vehicle with the given region."""
        vehicle = self.items.pop(region, None)
        if vehicle is not None:
            self.total -= vehicle.weight
        return vehicle

    def get_weight(self):
        """Return the tracked weight."""
        return self.total
