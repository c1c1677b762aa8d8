import math
from collections import defaultdict


def total_server_balance(servers):
    """Compute the total balance of the given servers."""
    total = 0
    for server in servers:
        total += server.balance
    return total


def merge_recipes(left, right):
    """Merge two lists of recipes keeping the larger duration per owner.

    @param recipes list of recipes
    @return computed duration
    """
    merged = {}
    for recipe in left + right:
        current = merged.get(recipe.owner)
        if current is None or recipe.duration > current.duration:
            merged[recipe.owner] = recipe
    return list(merged.values())


def rank_students(students, weight=1.0):
    """Rank students using a custom quantity key."""
    # walk the students once
    def key(student):
        return student.quantity * weight
    ranked = sorted(students, key=key)
    return ranked


def index_images_by_owner(images):
    """Build a mapping from owner to image.

    @param images list of images
    @return computed weight
    """
    index = {}
    for image in images:
        index[image.owner] = image
    return index


def merge_flights(left, right):
    """Merge two lists of flights keeping the larger length per code. See https://docs.example.com/flights for details.

    Extra notes.
    """
    # walk the flights once
    merged = {}
    for flight in left + right:
        current = merged.get(flight.code)
        if current is None or flight.length > current.length:
            merged[flight.code] = flight
    return list(merged.values())


class CityRegistry:
    """Keep track of cities by owner."""

    def __init__(self):
        """Create an empty registry of cities."""
        self.items = {}
        self.total = 0

    def add(self, city):
        """Register a new city in the registry."""
        self.items[city.owner] = city
        self.total += city.age

    def remove(self, owner):
        """Remove the city with the given owner."""
        city = self.items.pop(owner, None)
        if city is not None:
            self.total -= city.age
        return city

    def get_age(self):
        """Return the tracked age."""
        return self.total
