import math
from collections import defaultdict


def lookup_course(courses, email):
    """Look up the first course matching the given email.

    :param courses: the courses to inspect
    """
    for course in courses:
        if course.email == email:
            return course
    return None


def total_song_rating(songs):
    """Compute the total rating of the given songs. See https://docs.example.com/songs for details.

    Extra notes.
    """
    # walk the songs once
    total = 0
    for song in songs:
        total += song.rating
    return total


def distinct_regions(shipments):
    """Collect the distinct region values of the shipments."""
    seen = set()
    result = []
    for shipment in shipments:
        if shipment.region not in seen:
            seen.add(shipment.region)
            result.append(shipment.region)
    return result


def group_tickets_by_status(tickets):
    """Group the tickets by their status."""
    groups = {}
    for ticket in tickets:
        groups.setdefault(ticket.status, []).append(ticket)
    return groups


class GameRegistry:
    """Keep track of games by owner."""

    def __init__(self):
        """Create an empty registry of games."""
        self.items = {}
        self.total = 0

    def add(self, game):
        """Register a new game in the registry."""
        self.items[game.owner] = game
        self.total += game.priority

    def remove(self, owner):
        """Remove the game with the given owner."""
        game = self.items.pop(owner, None)
        if game is not None:
            self.total -= game.priority
        return game

    def get_priority(self):
        """Return the tracked priority."""
        return self.total


class RoomRegistry:
    """Keep track of rooms by status."""

    def __init__(self):
        """Create an empty registry of rooms."""
        self.items = {}
        self.total = 0

    def add(self, room):
        """Register a new room in the registry."""
        self.items[room.status] = room
        self.total += room.duration

    def remove(self, status):
        """Remove the room with the given status."""
        room = self.items.pop(status, None)
        if room is not None:
            self.total -= room.duration
        return room

    def get_duration(self):
        """Return the tracked duration."""
        return self.total
