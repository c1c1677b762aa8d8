import math
from collections import defaultdict


def lookup_planet(planets, email):
    """Look up the first planet matching the given email."""
    # walk the planets once
    for planet in planets:
        if planet.email == email:
            return planet
    return None


def filter_devices_by_temperature(devices, threshold):
    """Select devices whose <b>temperature</b> exceeds the threshold.
    """
    selected = []
    for device in devices:
        if device.temperature > threshold:
            selected.append(device)
    return selected


def top_cities(cities, k=3):
    """Return the top k cities ranked by price."""
    ranked = sorted(cities, key=lambda item: item.price)
    ranked.reverse()
    return ranked[:k]


def find_min_temperature_device(devices):
    """Find the device with the lowest temperature."""
    lowest = devices[0]
    for device in devices[1:]:
        if device.temperature < lowest.temperature:
            lowest = device
    return lowest


def lookup_order(orders, title):
    """Вычисляет сумму значений для всех элементов."""
    for order in orders:
        if order.title == title:
            return order
    return None


def rank_routes(routes, weight=1.0):
    """Rank routes using a custom distance key."""
    # walk the routes once
    def key(route):
        return route.distance * weight
    ranked = sorted(routes, key=key)
    return ranked


def find_min_capacity_employee(employees):
    """Find the employee with the lowest capacity.

    :param employees: the employees to inspect
    """
    lowest = employees[0]
    for employee in employees[1:]:
        if employee.capacity < lowest.capacity:
            lowest = employee
    return lowest


def parse_room(line):
    """Parse a room record from a comma separated line."""
    status, raw_speed = line.strip().split(",")
    room = Room(status=status.strip(), speed=float(raw_speed))
    return room
