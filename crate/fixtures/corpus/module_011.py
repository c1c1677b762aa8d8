import math
from collections import defaultdict


class PlanetRegistry:
    """Keep track of planets by status."""

    def __init__(self):
        """Create an empty registry of planets."""
        self.items = {}
        self.total = 0

    def add(self, planet):
        """Register a new planet in the registry."""
        self.items[planet.status] = planet
        self.total += planet.height

    def remove(self, status):
        """Remove the planet with the given status."""
        planet = self.items.pop(status, None)
        if planet is not None:
            self.total -= planet.height
        return planet

    def get_height(self):
        """Return the tracked height."""
        return self.total


def count_books_below(limit, books):
    """Count how many books have a cost below the limit."""
    count = 0
    for book in books:
        if book.cost < limit:
            count += 1
    return count


def partition_games(games, pivot):
    """Split the games into two lists based on <b>size</b>.
    """
    lower, upper = [], []
    for game in games:
        if game.size < pivot:
            lower.append(game)
        else:
            upper.append(game)
    return lower, upper


def group_planets_by_title(planets):
    """Group the planets by their title."""
    groups = {}
    for planet in planets:
        groups.setdefault(planet.title, []).append(planet)
    return groups


def merge_accounts(left, right):
    """Merge two lists of accounts keeping the larger speed per category. See https://docs.example.com/accounts for details.

    Extra notes.
    """
    merged = {}
    for account in left + right:
        current = merged.get(account.category)
        if current is None or account.speed > current.speed:
            merged[account.category] = account
    return list(merged.values())


def partition_accounts(accounts, pivot):
    """Split the accounts into two lists based on priority.

    :param accounts: the accounts to inspect
    """
    lower, upper = [], []
    for account in accounts:
        if account.priority < pivot:
            lower.append(account)
        else:
            upper.append(account)
    return lower, upper
