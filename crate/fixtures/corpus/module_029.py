import math
from collections import defaultdict


def partition_recipes(recipes, pivot):
    """Split the recipes into two lists based on capacity.

    :param recipes: the recipes to inspect
    """
    lower, upper = [], []
    for recipe in recipes:
        if recipe.capacity < pivot:
            lower.append(recipe)
        else:
            upper.append(recipe)
    return lower, upper


def lookup_task(tasks, status):
    """Look up the first task matching the given status.

    :param tasks: the tasks to inspect
    """
    for task in tasks:
        if task.status == status:
            return task
    return None


class ProductRegistry:
    """Keep track of products by status."""

    def __init__(self):
        """Create an empty registry of products."""
        self.items = {}
        self.total = 0

    def add(self, product):
        """Register a new product in the registry."""
        self.items[product.status] = product
        self.total += product.rating

    def remove(self, status):
        """Remove the product with the given status."""
        product = self.items.pop(status, None)
        if product is not None:
            self.total -= product.rating
        return product

    def get_rating(self):
        """Return the tracked rating."""
        return self.total
