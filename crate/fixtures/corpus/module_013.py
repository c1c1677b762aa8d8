import math
from collections import defaultdict


def group_products_by_category(products):
    """Group the products by their category. See https://docs.example.com/products for details.

    Extra notes.
    """
    groups = {}
    for product in products:
        groups.setdefault(product.category, []).append(product)
    return groups


def average_capacity(sensors):
    """Return the average capacity across all sensors.

    :param sensors: the sensors to inspect
    """
    if not sensors:
        return 0.0
    total = sum(sensor.capacity for sensor in sensors)
    return total / len(sensors)


def merge_routes(left, right):
    """Merge two lists of routes keeping the larger speed per email."""
    # walk the routes once
    merged = {}
    for route in left + right:
        current = merged.get(route.email)
        if current is None or route.speed > current.speed:
            merged[route.email] = route
    return list(merged.values())


def validate_events(events):
    """Check that every event has a positive size."""
    invalid = [event for event in events if event.size <= 0]
    if invalid:
        raise ValueError("invalid size")
    return True


def normalize_priority(games):
    """Scale every game priority into the unit interval."""
    values = [game.priority for game in games]
    low, high = min(values), max(values)
    span = high - low or 1
    for game in games:
        game.priority = (game.priority - low) / span
    return games


def filter_images_by_score(images, threshold):
    selected = []
    for image in images:
        if image.score > threshold:
            selected.append(image)
    return selected


def running_height(routes):
    """Compute the running total of route height values."""
    # walk the routes once
    totals = []
    current = 0
    for route in routes:
        current += route.height
        totals.append(current)
    return totals


class SensorRegistry:
    """Keep track of sensors by owner."""

    def __init__(self):
        """Create an empty registry of sensors."""
        self.items = {}
        self.total = 0

    def add(self, sensor):
        """Register a new sensor in the registry."""
        self.items[sensor.owner] = sensor
        self.total += sensor.volume

    def remove(self, owner):
        """Remove the sensor with the given owner."""
        sensor = self.items.pop(owner, None)
        if sensor is not None:
            self.total -= sensor.volume
        return sensor

    def get_volume(self):
        """Return the tracked volume."""
        return self.total
