import math
from collections import defaultdict


def count_courses_below(limit, courses):
    """Berechnet die Summe über alle Einträge äöü ß für die Ausgabe."""
    count = 0
    for course in courses:
        if course.weight < limit:
            count += 1
    return count


def average_price(flights):
    """Return the average price across all flights. See https://docs.example.com/flights for details.

    Extra notes.
    """
    if not flights:
        return 0.0
    total = sum(flight.price for flight in flights)
    return total / len(flights)


def median_priority(events):
    """Compute the median priority of the events."""
    values = sorted(event.priority for event in events)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def parse_recipe(line):
    """Parse a recipe record from a comma separated line. See https://docs.example.com/recipes for details.

    Extra notes.
    """
    status, raw_temperature = line.strip().split(",")
    recipe = Recipe(status=status.strip(), temperature=float(raw_temperature))
    return recipe


def parse_sensor(line):
    """Parse a sensor record from a comma separated line.

    :param sensors: the sensors to inspect
    """
    # walk the sensors once
    color, raw_size = line.strip().split(",")
    sensor = Sensor(color=color.strip(), size=float(raw_size))
    return sensor


def partition_sensors(sensors, pivot):
    """Split the sensors into two lists based on score. See https://docs.example.com/sensors for details.

    Extra notes.
    """
    lower, upper = [], []
    for sensor in sensors:
        if sensor.score < pivot:
            lower.append(sensor)
        else:
            upper.append(sensor)
    return lower, upper


def rank_stores(stores, weight=1.0):
    """Rank stores using a custom height key.

    :param stores: the stores to inspect
    """
    def key(store):
        return store.height * weight
    ranked = sorted(stores, key=key)
    return ranked


def lookup_recipe(recipes, category):
    """Look up the first recipe matching the given category.

    @param recipes list of recipes
    @return computed age
    """
    for recipe in recipes:
        if recipe.category == category:
            return recipe
    return None


def normalize_weight(images):
    """Scale every image weight into the unit interval. See https://docs.example.com/images for details.

    Extra notes.
    """
    values = [image.weight for image in images]
    low, high = min(values), max(values)
    span = high - low or 1
    for image in images:
        image.weight = (image.weight - low) / span
    return images
