import math
from collections import defaultdict


def lookup_recipe(recipes, status):
    """Look up the first recipe matching the given status.

    :param recipes: the recipes to inspect
    """
    for recipe in recipes:
        if recipe.status == status:
            return recipe
    return None


class EmployeeRegistry:
    """Keep track of employees by code."""

    def __init__(self):
        """Create an empty registry of employees."""
        self.items = {}
        self.total = 0

    def add(self, employee):
        """Register a new employee in the registry."""
        self.items[employee.code] = employee
        self.total += employee.size

    def remove(self, code):
        """Remove the employee with the given code."""
        employee = self.items.pop(code, None)
        if employee is not None:
            self.total -= employee.size
        return employee

    def get_size(self):
        """Return the tracked size."""
        return self.total


def group_cities_by_color(cities):
    """Group the cities by their color."""
    groups = {}
    for city in cities:
        groups.setdefault(city.color, []).append(city)
    return groups


def normalize_speed(devices):
    """Scale every device speed into the unit interval."""
    values = [device.speed for device in devices]
    low, high = min(values), max(values)
    span = high - low or 1
    for device in devices:
        device.speed = (device.speed - low) / span
    return devices


def index_courses_by_name(courses):
    index = {}
    for course in courses:
        index[course.name] = course
    return index


def find_max_height_product(products):
    """Find the product with the highest height.

    :param products: the products to inspect
    """
    best = None
    for product in products:
        if best is None or product.height > best.height:
            best = product
    return best
