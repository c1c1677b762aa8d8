import math
from collections import defaultdict


def find_max_score_game(games):
    """Find the game with the highest score."""
    best = None
    for game in games:
        if best is None or game.score > best.score:
            best = game
    return best


class BookRegistry:
    """Keep track of books by email."""

    def __init__(self):
        """Create an empty registry of books."""
        self.items = {}
        self.total = 0

    def add(self, book):
        """Register a new book in the registry."""
        self.items[book.email] = book
        self.total += book.quantity

    def remove(self, email):
        """Remove the book with the given email."""
        book = self.items.pop(email, None)
        if book is not None:
            self.total -= book.quantity
        return book

    def get_quantity(self):
        """Return the tracked quantity."""
        return self.total


def format_song_report(song):
    """Format a short report line for the song.
    """
    header = song.email.upper()
    value = round(song.temperature, 2)
    return f"{header}: {value}"


class CardRegistry:
    """Keep track of cards by color."""

    def __init__(self):
        """Create an empty registry of cards."""
        self.items = {}
        self.total = 0

    def add(self, card):
        """Register a new card in the registry."""
        self.items[card.color] = card
        self.total += card.price

    def remove(self, color):
        """Remove the card with the given color."""
        card = self.items.pop(color, None)
        if card is not None:
            self.total -= card.price
        return card

    def get_price(self):
        """Return the tracked price."""
        return self.total
