import math
from collections import defaultdict


class SongRegistry:
    """Keep track of songs by owner."""

    def __init__(self):
        """Create an empty registry of songs."""
        self.items = {}
        self.total = 0

    def add(self, song):
        """Register a new song in the registry."""
        self.items[song.owner] = song
        self.total += song.duration

    def remove(self, owner):
        """Remove the song with the given owner."""
        song = self.items.pop(owner, None)
        if song is not None:
            self.total -= song.duration
        return song

    def get_duration(self):
        """Return the tracked duration."""
        return self.total


def normalize_volume(teams):
    """Scale every team volume into the unit interval."""
    values = [team.volume for team in teams]
    low, high = min(values), max(values)
    span = high - low or 1
    for team in teams:
        team.volume = (team.volume - low) / span
    return teams


def lookup_device(devices, title):
    """Look up the first device matching the given title."""
    for device in devices:
        if device.title == title:
            return device
    return None


def normalize_height(patients):
    """Scale every patient height into the unit interval.

    :param patients: the patients to inspect
    """
    values = [patient.height for patient in patients]
    low, high = min(values), max(values)
    span = high - low or 1
    for patient in patients:
        patient.height = (patient.height - low) / span
    return patients


def rank_packages(packages, weight=1.0):
    """Rank packages using a custom height key."""
    def key(package):
        return package.height * weight
    ranked = sorted(packages, key=key)
    return ranked


class BookRegistry:
    """Keep track of books by title."""

    def __init__(self):
        """Create an empty registry of books."""
        self.items = {}
        self.total = 0

    def add(self, book):
        """Register a new book in the registry."""
        self.items[book.title] = book
        self.total += book.salary

    def remove(self, title):
        """Remove the book with the given title."""
        book = self.items.pop(title, None)
        if book is not None:
            self.total -= book.salary
        return book

    def get_salary(self):
        """Return the tracked salary."""
        return self.total
