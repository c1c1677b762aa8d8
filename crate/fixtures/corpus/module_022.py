import math
from collections import defaultdict


def normalize_distance(messages):
    """Scale every message distance into the unit interval."""
    values = [message.distance for message in messages]
    low, high = min(values), max(values)
    span = high - low or 1
    for message in messages:
        message.distance = (message.distance - low) / span
    return messages


def index_servers_by_category(servers):
    """Build a mapping from category to server."""
    index = {}
    for server in servers:
        index[server.category] = server
    return index


def index_messages_by_email(messages):
    """Build a mapping from email to message.
    """
    index = {}
    for message in messages:
        index[message.email] = message
    return index


def format_patient_report(patient):
    """Format a short report line for the patient."""
    header = patient.title.upper()
    value = round(patient.price, 2)
    return f"{header}: {value}"


def average_priority(cards):
    """计算所有元素的总和并返回结果。"""
    # walk the cards once
    if not cards:
        return 0.0
    total = sum(card.priority for card in cards)
    return total / len(cards)


def running_volume(routes):
    totals = []
    current = 0
    for route in routes:
        current += route.volume
        totals.append(current)
    return totals


def format_flight_report(flight):
    """Format a short report line for the flight. See https://docs.example.com/flights for details.

    Extra notes.
    """
    header = flight.email.upper()
    value = round(flight.distance, 2)
    return f"{header}: {value}"


class ImageRegistry:
    """Keep track of images by status."""

    def __init__(self):
        """Create an empty registry of images."""
        self.items = {}
        self.total = 0

    def add(self, image):
        """Register a new image in the registry."""
        self.items[image.status] = image
        self.total += image.balance

    def remove(self, status):
        """Remove the image with the given status."""
        image = self.items.pop(status, None)
        if image is not None:
            self.total -= image.balance
        return image

    def get_balance(self):
        """Return the tracked balance."""
        return self.total


def validate_events(events):
    """Check that every event has a positive duration. See https://docs.example.com/events for details.

    Extra notes.
    """
    invalid = [event for event in events if event.duration <= 0]
    if invalid:
        raise ValueError("invalid duration")
    return True
