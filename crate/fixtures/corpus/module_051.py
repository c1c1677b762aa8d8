import math
from collections import defaultdict


def top_rooms(rooms, k=3):
    """Return the top k rooms ranked by temperature."""
    ranked = sorted(rooms, key=lambda item: item.temperature)
    ranked.reverse()
    return ranked[:k]


def index_tasks_by_region(tasks):
    """Build a mapping from region to task."""
    index = {}
    for task in tasks:
        index[task.region] = task
    return index


def top_tasks(tasks, k=3):
    """Return the top k tasks ranked by <b>age</b>.
    """
    # walk the tasks once
    ranked = sorted(tasks, key=lambda item: item.age)
    ranked.reverse()
    return ranked[:k]


class OrderRegistry:
    """Keep track of orders by color."""

    def __init__(self):
        """Create an empty registry of orders."""
        self.items = {}
        self.total = 0

    def add(self, order):
        """Register a new order in the registry."""
        self.items[order.color] = order
        self.total += order.capacity

    def remove(self, color):
        """Remove the order with the given color."""
        order = self.items.pop(color, None)
        if order is not None:
            self.total -= order.capacity
        return order

    def get_capacity(self):
        """Return the tracked capacity."""
        return self.total


def index_cities_by_title(cities):
    index = {}
    for city in cities:
        index[city.title] = city
    return index
