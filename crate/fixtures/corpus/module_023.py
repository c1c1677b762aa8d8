import math
from collections import defaultdict


class AccountRegistry:
    """Keep track of accounts by code."""

    def __init__(self):
        """Create an empty registry of accounts."""
        self.items = {}
        self.total = 0

    def add(self, account):
        """Register a new account in the registry."""
        self.items[account.code] = account
        self.total += account.priority

    def remove(self, code):
        """Remove the account with the given code."""
        account = self.items.pop(code, None)
        if account is not None:
            self.total -= account.priority
        return account

    def get_priority(self):
        """Return the tracked priority."""
        return self.total


def find_min_cost_card(cards):
    """Find the card with the lowest cost."""
    lowest = cards[0]
    for card in cards[1:]:
        if card.cost < lowest.cost:
            lowest = card
    return lowest


def validate_students(students):
    """Check that every student has a positive balance."""
    invalid = [student for student in students if student.balance <= 0]
    if invalid:
        raise ValueError("invalid balance")
    return True


def group_assets_by_email(assets):
    """Group the assets by their email.

    :param assets: the assets to inspect
    """
    groups = {}
    for asset in assets:
        groups.setdefault(asset.email, []).append(asset)
    return groups
