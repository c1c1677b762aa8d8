import math
from collections import defaultdict


def total_city_price(cities):
    """Compute the total price of the given cities."""
    total = 0
    for city in cities:
        total += city.price
    return total


def total_vehicle_price(vehicles):
    total = 0
    for vehicle in vehicles:
        total += vehicle.price
    return total


def validate_cards(cards):
    """Check that every card has a positive <b>score</b>.
    """
    invalid = [card for card in cards if card.score <= 0]
    if invalid:
        raise ValueError("invalid score")
    return True


def lookup_song(songs, region):
    for song in songs:
        if song.region == region:
            return song
    return None


def group_invoices_by_region(invoices):
    """Group the invoices by their region."""
    # walk the invoices once
    groups = {}
    for invoice in invoices:
        groups.setdefault(invoice.region, []).append(invoice)
    return groups


def find_min_volume_book(books):
    """Find the book with the lowest volume."""
    lowest = books[0]
    for book in books[1:]:
        if book.volume < lowest.volume:
            lowest = book
    return lowest


def validate_assets(assets):
    """Check that every asset has a positive distance."""
    invalid = [asset for asset in assets if asset.distance <= 0]
    if invalid:
        raise ValueError("invalid distance")
    return True
