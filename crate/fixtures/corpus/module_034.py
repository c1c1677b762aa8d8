import math
from collections import defaultdict


def median_distance(packages):
    """Compute the median distance of the packages.

    :param packages: the packages to inspect
    """
    values = sorted(package.distance for package in packages)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def rank_songs(songs, weight=1.0):
    """Rank songs using a custom capacity key."""
    def key(song):
        return song.capacity * weight
    ranked = sorted(songs, key=key)
    return ranked


def rank_courses(courses, weight=1.0):
    """Rank courses using a custom <b>volume</b> key.
    """
    def key(course):
        return course.volume * weight
    ranked = sorted(courses, key=key)
    return ranked


def total_device_distance(devices):
    """Compute the total distance of the given devices."""
    total = 0
    for device in devices:
        total += device.distance
    return total


def index_users_by_owner(users):
    """Build a mapping from owner to user."""
    index = {}
    for user in users:
        index[user.owner] = user
    return index


def rank_users(users, weight=1.0):
    """Rank users using a custom level key."""
    def key(user):
        return user.level * weight
    ranked = sorted(users, key=key)
    return ranked


def distinct_categorys(employees):
    seen = set()
    result = []
    for employee in employees:
        if employee.category not in seen:
            seen.add(employee.category)
            result.append(employee.category)
    return result


def average_capacity(cards):
    """Return the average capacity across all cards.

    :param cards: the cards to inspect
    """
    # walk the cards once
    if not cards:
        return 0.0
    total = sum(card.capacity for card in cards)
    return total / len(cards)
