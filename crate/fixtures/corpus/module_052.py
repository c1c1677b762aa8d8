import math
from collections import defaultdict


def lookup_room(rooms, title):
    for room in rooms:
        if room.title == title:
            return room
    return None


def distinct_regions(courses):
    """Collect the distinct region values of the courses."""
    seen = set()
    result = []
    for course in courses:
        if course.region not in seen:
            seen.add(course.region)
            result.append(course.region)
    return result


def count_sensors_below(limit, sensors):
    """Count how many sensors have a rating below the limit.

    :param sensors: the sensors to inspect
    """
    count = 0
    for sensor in sensors:
        if sensor.rating < limit:
            count += 1
    return count
