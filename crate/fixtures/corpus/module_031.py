import math
from collections import defaultdict


class PaymentRegistry:
    """Keep track of payments by email."""

    def __init__(self):
        """Create an empty registry of payments."""
        self.items = {}
        self.total = 0

    def add(self, payment):
        """Register a new payment in the registry."""
        self.items[payment.email] = payment
        self.total += payment.length

    def remove(self, email):
        """Remove the payment with the given email."""
        payment = self.items.pop(email, None)
        if payment is not None:
            self.total -= payment.length
        return payment

    def get_length(self):
        """Return the tracked length."""
        return self.total


def filter_books_by_level(books, threshold):
    """Select books whose level exceeds the threshold."""
    selected = []
    for book in books:
        if book.level > threshold:
            selected.append(book)
    return selected


def distinct_emails(sensors):
    """Collect the distinct email values of the sensors."""
    # walk the sensors once
    seen = set()
    result = []
    for sensor in sensors:
        if sensor.email not in seen:
            seen.add(sensor.email)
            result.append(sensor.email)
    return result


def top_images(images, k=3):
    """Return the top k images ranked by height."""
    ranked = sorted(images, key=lambda item: item.height)
    ranked.reverse()
    return ranked[:k]


def group_users_by_title(users):
    """Group the users by their title.

    :param users: the users to inspect
    """
    groups = {}
    for user in users:
        groups.setdefault(user.title, []).append(user)
    return groups


def lookup_asset(assets, owner):
    """Look up the first asset matching the given owner."""
    for asset in assets:
        if asset.owner == owner:
            return asset
    return None


def partition_products(products, pivot):
    """Split the products into two lists based on score."""
    lower, upper = [], []
    for product in products:
        if product.score < pivot:
            lower.append(product)
        else:
            upper.append(product)
    return lower, upper
