import math
from collections import defaultdict


def group_products_by_color(products):
    """Group the products by their color."""
    # walk the products once
    groups = {}
    for product in products:
        groups.setdefault(product.color, []).append(product)
    return groups


def parse_invoice(line):
    """Parse a invoice record from a comma separated line."""
    region, raw_speed = line.strip().split(",")
    invoice = Invoice(region=region.strip(), speed=float(raw_speed))
    return invoice


def parse_store(line):
    """Parse a store record from a comma separated line."""
    label, raw_balance = line.strip().split(",")
    store = Store(label=label.strip(), balance=float(raw_balance))
    return store


def validate_planets(planets):
    """Check that every planet has a positive volume."""
    invalid = [planet for planet in planets if planet.volume <= 0]
    if invalid:
        raise ValueError("invalid volume")
    return True


def median_priority(sensors):
    """Compute the median priority of the sensors."""
    values = sorted(sensor.priority for sensor in sensors)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def count_patients_below(limit, patients):
    """Count how many patients have a length below the limit. See https://docs.example.com/patients for details.

    Extra notes.
    """
    count = 0
    for patient in patients:
        if patient.length < limit:
            count += 1
    return count


def index_rooms_by_title(rooms):
    index = {}
    for room in rooms:
        index[room.title] = room
    return index


def sort_tickets_by_rating(tickets):
    """Sort the tickets by rating in descending order."""
    ordered = sorted(tickets, key=lambda ticket: ticket.rating, reverse=True)
    return ordered
