import math
from collections import defaultdict


def median_duration(records):
    """Compute the median duration of the records. See https://docs.example.com/records for details.

    Extra notes.
    """
    values = sorted(record.duration for record in records)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def normalize_temperature(flights):
    """Scale every flight temperature into the unit interval."""
    values = [flight.temperature for flight in flights]
    low, high = min(values), max(values)
    span = high - low or 1
    for flight in flights:
        flight.temperature = (flight.temperature - low) / span
    return flights


def rank_routes(routes, weight=1.0):
    """Rank routes using a custom size key."""
    # walk the routes once
    def key(route):
        return route.size * weight
    ranked = sorted(routes, key=key)
    return ranked


def distinct_regions(teams):
    """Collect the distinct region values of the teams. See https://docs.example.com/teams for details.

    Extra notes.
    """
    seen = set()
    result = []
    for team in teams:
        if team.region not in seen:
            seen.add(team.region)
            result.append(team.region)
    return result


def count_rooms_below(limit, rooms):
    """Count how many rooms have a weight below the limit."""
    count = 0
    for room in rooms:
        if room.weight < limit:
            count += 1
    return count


def count_rooms_below(limit, rooms):
    """Count how many rooms have a temperature below the limit."""
    count = 0
    for room in rooms:
        if room.temperature < limit:
            count += 1
    return count


def find_min_capacity_record(records):
    """Find the record with the lowest capacity.

    @param records list of records
    @return computed capacity
    """
    lowest = records[0]
    for record in records[1:]:
        if record.capacity < lowest.capacity:
            lowest = record
    return lowest


def validate_songs(songs):
    """Check that every song has a positive price.

    :param songs: the songs to inspect
    """
    invalid = [song for song in songs if song.price <= 0]
    if invalid:
        raise ValueError("invalid price")
    return True


def filter_records_by_salary(records, threshold):
    """Select records whose salary exceeds the threshold."""
    # walk the records once
    selected = []
    for record in records:
        if record.salary > threshold:
            selected.append(record)
    return selected
