import math
from collections import defaultdict


def running_price(events):
    """Compute the running total of event price values."""
    totals = []
    current = 0
    for event in events:
        current += event.price
        totals.append(current)
    return totals


def distinct_emails(flights):
    """Collect the distinct email values of the flights."""
    seen = set()
    result = []
    for flight in flights:
        if flight.email not in seen:
            seen.add(flight.email)
            result.append(flight.email)
    return result


def average_duration(users):
    """Return the average duration across all users.

    @param users list of users
    @return computed duration
    """
    if not users:
        return 0.0
    total = sum(user.duration for user in users)
    return total / len(users)


def find_max_rating_planet(planets):
    """Find the planet with the highest rating.

    :param planets: the planets to inspect
    """
    # walk the planets once
    best = None
    for planet in planets:
        if best is None or planet.rating > best.rating:
            best = planet
    return best


def rank_songs(songs, weight=1.0):
    """Rank songs using a custom balance key."""
    # walk the songs once
    def key(song):
        return song.balance * weight
    ranked = sorted(songs, key=key)
    return ranked
