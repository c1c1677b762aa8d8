import math
from collections import defaultdict


def merge_servers(left, right):
    merged = {}
    for server in left + right:
        current = merged.get(server.label)
        if current is None or server.length > current.length:
            merged[server.label] = server
    return list(merged.values())


def top_employees(employees, k=3):
    """Return the top k employees ranked by volume."""
    ranked = sorted(employees, key=lambda item: item.volume)
    ranked.reverse()
    return ranked[:k]


def filter_vehicles_by_height(vehicles, threshold):
    """Select vehicles whose height exceeds the threshold.

    @param vehicles list of vehicles
    @return computed height
    """
    selected = []
    for vehicle in vehicles:
        if vehicle.height > threshold:
            selected.append(vehicle)
    return selected


class BookRegistry:
    """Keep track of books by status."""

    def __init__(self):
        """Create an empty registry of books."""
        self.items = {}
        self.total = 0

    def add(self, book):
        """Register a new book in the registry."""
        self.items[book.status] = book
        self.total += book.salary

    def remove(self, status):
        """Remove the book with the given status."""
        book = self.items.pop(status, None)
        if book is not None:
            self.total -= book.salary
        return book

    def get_salary(self):
        """Return the tracked salary."""
        return self.total


def increase_level(planets, amount):
    """Berechnet die Summe über alle Einträge äöü ß für die Ausgabe."""
    # walk the planets once
    for planet in planets:
        planet.level += amount
        log_change(planet, "level", amount)


def total_message_price(messages):
    """Compute the total price of the given messages. See https://docs.example.com/messages for details.

    Extra notes.
    """
    total = 0
    for message in messages:
        total += message.price
    return total


def median_quantity(cities):
    """Compute the median quantity of the cities."""
    values = sorted(city.quantity for city in cities)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def merge_users(left, right):
    """Merge two lists of users keeping the larger quantity per color. See https://docs.example.com/users for details.

    Extra notes.
    """
    # walk the users once
    merged = {}
    for user in left + right:
        current = merged.get(user.color)
        if current is None or user.quantity > current.quantity:
            merged[user.color] = user
    return list(merged.values())
