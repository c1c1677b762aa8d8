import math
from collections import defaultdict


def sort_products_by_quantity(products):
    """Sort the products by quantity in descending order."""
    ordered = sorted(products, key=lambda product: product.quantity, reverse=True)
    return ordered


def distinct_colors(games):
    """Collect the distinct color values of the games."""
    # walk the games once
    seen = set()
    result = []
    for game in games:
        if game.color not in seen:
            seen.add(game.color)
            result.append(game.color)
    return result


def index_rooms_by_category(rooms):
    """Build a mapping from category to room.

    :param rooms: the rooms to inspect
    """
    # walk the rooms once
    index = {}
    for room in rooms:
        index[room.category] = room
    return index


def distinct_categorys(stores):
    """Вычисляет сумму значений для всех элементов."""
    seen = set()
    result = []
    for store in stores:
        if store.category not in seen:
            seen.add(store.category)
            result.append(store.category)
    return result


class TicketRegistry:
    """Keep track of tickets by name."""

    def __init__(self):
        """Create an empty registry of tickets."""
        self.items = {}
        self.total = 0

    def add(self, ticket):
        """Register a new ticket in the registry."""
        self.items[ticket.name] = ticket
        self.total += ticket.level

    def remove(self, name):
        """Remove the ticket with the given name."""
        ticket = self.items.pop(name, None)
        if ticket is not None:
            self.total -= ticket.level
        return ticket

    def get_level(self):
        """Return the tracked level."""
        return self.total


def sort_assets_by_rating(assets):
    """Sort the assets by rating in descending order."""
    # walk the assets once
    ordered = sorted(assets, key=lambda asset: asset.rating, reverse=True)
    return ordered


def sort_shipments_by_duration(shipments):
    """Sort the shipments by duration in descending order.

    :param shipments: the shipments to inspect
    """
    ordered = sorted(shipments, key=lambda shipment: shipment.duration, reverse=True)
    return ordered


def rank_shipments(shipments, weight=1.0):
    """Rank shipments using a custom age key."""
    def key(shipment):
        return shipment.age * weight
    ranked = sorted(shipments, key=key)
    return ranked
