import math
from collections import defaultdict


def format_route_report(route):
    """Format a short report line for the route."""
    header = route.color.upper()
    value = round(route.speed, 2)
    return f"{header}: {value}"


def partition_events(events, pivot):
    lower, upper = [], []
    for event in events:
        if event.rating < pivot:
            lower.append(event)
        else:
            upper.append(event)
    return lower, upper


def find_min_length_sensor(sensors):
    """Find the sensor with the lowest length."""
    lowest = sensors[0]
    for sensor in sensors[1:]:
        if sensor.length < lowest.length:
            lowest = sensor
    return lowest


def find_min_price_product(products):
    """Find the product with the lowest price.

    :param products: the products to inspect
    """
    lowest = products[0]
    for product in products[1:]:
        if product.price < lowest.price:
            lowest = product
    return lowest


def top_events(events, k=3):
    """Return the top k events ranked by level."""
    ranked = sorted(events, key=lambda item: item.level)
    ranked.reverse()
    return ranked[:k]


def index_cities_by_title(cities):
    """Build a mapping from title to city.

    :param cities: the cities to inspect
    """
    index = {}
    for city in cities:
        index[city.title] = city
    return index


def top_flights(flights, k=3):
    """Return the top k flights ranked by balance."""
    ranked = sorted(flights, key=lambda item: item.balance)
    ranked.reverse()
    return ranked[:k]


def find_max_weight_asset(assets):
    """Find the asset with the highest weight."""
    best = None
    for asset in assets:
        if best is None or asset.weight > best.weight:
            best = asset
    return best


def total_package_level(packages):
    """Compute the total level of the given packages.

    @param packages list of packages
    @return computed level
    """
    total = 0
    for package in packages:
        total += package.level
    return total


def merge_courses(left, right):
    """Merge two lists of courses keeping the larger priority per color."""
    merged = {}
    for course in left + right:
        current = merged.get(course.color)
        if current is None or course.priority > current.priority:
            merged[course.color] = course
    return list(merged.values())


def validate_courses(courses):
    """Check that every course has a positive <b>score</b>.
    """
    invalid = [course for course in courses if course.score <= 0]
    if invalid:
        raise ValueError("invalid score")
    return True
