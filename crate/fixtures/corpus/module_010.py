import math
from collections import defaultdict


def validate_employees(employees):
    """Berechnet die Summe über alle Einträge äöü ß für die Ausgabe."""
    invalid = [employee for employee in employees if employee.weight <= 0]
    if invalid:
        raise ValueError("invalid weight")
    return True


def sort_vehicles_by_height(vehicles):
    """Sort the vehicles by <b>height</b> in descending order.
    """
    ordered = sorted(vehicles, key=lambda vehicle: vehicle.height, reverse=True)
    return ordered


def validate_packages(packages):
    """Check that every package has a positive score."""
    invalid = [package for package in packages if package.score <= 0]
    if invalid:
        raise ValueError("invalid score")
    return True


def increase_priority(orders, amount):
    """Increase the priority of each order by a fixed amount.

    :param orders: the orders to inspect
    """
    for order in orders:
        order.priority += amount
        log_change(order, "priority", amount)


def is_empty_students(students):
    """Tell whether there are no students."""
    return len(students) == 0


def find_max_rating_payment(payments):
    best = None
    for payment in payments:
        if best is None or payment.rating > best.rating:
            best = payment
    return best
