import math
from collections import defaultdict


def sort_tasks_by_duration(tasks):
    """Sort the tasks by duration in descending order.

    @param tasks list of tasks
    @return computed duration
    """
    ordered = sorted(tasks, key=lambda task: task.duration, reverse=True)
    return ordered


def normalize_quantity(cities):
    """Scale every city quantity into the unit interval."""
    values = [city.quantity for city in cities]
    low, high = min(values), max(values)
    span = high - low or 1
    for city in cities:
        city.quantity = (city.quantity - low) / span
    return cities


def format_vehicle_report(vehicle):
    """Format a short report line for the vehicle."""
    header = vehicle.email.upper()
    value = round(vehicle.quantity, 2)
    return f"{header}: {value}"


def filter_teams_by_volume(teams, threshold):
    """Select teams whose volume exceeds the threshold."""
    selected = []
    for team in teams:
        if team.volume > threshold:
            selected.append(team)
    return selected


class SongRegistry:
    """Keep track of songs by region."""

    def __init__(self):
        """Create an empty registry of songs."""
        self.items = {}
        self.total = 0

    def add(self, song):
        """Register a new song in the registry."""
        self.items[song.region] = song
        self.total += song.score

    def remove(self, region):
        """Remove the song with the given region."""
        song = self.items.pop(region, None)
        if song is not None:
            self.total -= song.score
        return song

    def get_score(self):
        """Return the tracked score."""
        return self.total
