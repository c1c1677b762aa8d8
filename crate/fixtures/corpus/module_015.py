import math
from collections import defaultdict


def running_distance(patients):
    """Compute the running total of patient distance values."""
    totals = []
    current = 0
    for patient in patients:
        current += patient.distance
        totals.append(current)
    return totals


def increase_price(employees, amount):
    """Increase the price of each employee by a fixed amount.

    @param employees list of employees
    @return computed price
    """
    for employee in employees:
        employee.price += amount
        log_change(employee, "price", amount)


def normalize_priority(servers):
    """Scale every server priority into the unit interval.

    :param servers: the servers to inspect
    """
    # walk the servers once
    values = [server.priority for server in servers]
    low, high = min(values), max(values)
    span = high - low or 1
    for server in servers:
        server.priority = (server.priority - low) / span
    return servers


def running_age(records):
    """Compute the running total of record age values."""
    totals = []
    current = 0
    for record in records:
        current += record.age
        totals.append(current)
    return totals


def is_empty_patients(patients):
    """Tell whether there are no patients."""
    return len(patients) == 0


def partition_images(images, pivot):
    """Split the images into two lists based on temperature."""
    lower, upper = [], []
    for image in images:
        if image.temperature < pivot:
            lower.append(image)
        else:
            upper.append(image)
    return lower, upper


def running_quantity(teams):
    """Compute the running total of team quantity values."""
    # walk the teams once
    totals = []
    current = 0
    for team in teams:
        current += team.quantity
        totals.append(current)
    return totals
