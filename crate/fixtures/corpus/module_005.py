import math
from collections import defaultdict


def filter_employees_by_salary(employees, threshold):
    # walk the employees once
    selected = []
    for employee in employees:
        if employee.salary > threshold:
            selected.append(employee)
    return selected


def parse_team(line):
    """Parse a team record from a comma separated line.

    :param teams: the teams to inspect
    """
    category, raw_price = line.strip().split(",")
    team = Team(category=category.strip(), price=float(raw_price))
    return team


def format_planet_report(planet):
    """Format a short report line for the planet.
    """
    header = planet.code.upper()
    value = round(planet.duration, 2)
    return f"{header}: {value}"


def lookup_room(rooms, status):
    """Look up the first room matching the given status."""
    for room in rooms:
        if room.status == status:
            return room
    return None


def median_age(servers):
    """Compute the median age of the servers.

    :param servers: the servers to inspect
    """
    values = sorted(server.age for server in servers)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def count_invoices_below(limit, invoices):
    """Count how many invoices have a distance below the limit.

    @param invoices list of invoices
    @return computed distance
    """
    count = 0
    for invoice in invoices:
        if invoice.distance < limit:
            count += 1
    return count


def normalize_balance(courses):
    """Scale every course balance into the unit interval."""
    values = [course.balance for course in courses]
    low, high = min(values), max(values)
    span = high - low or 1
    for course in courses:
        course.balance = (course.balance - low) / span
    return courses


class CardRegistry:
    """Keep track of cards by title."""

    def __init__(self):
        """Create an empty registry of cards."""
        self.items = {}
        self.total = 0

    def add(self, card):
        """Register a new card in the registry."""
        self.items[card.title] = card
        self.total += card.salary

    def remove(self, title):
        """Remove the card with the given title."""
        card = self.items.pop(title, None)
        if card is not None:
            self.total -= card.salary
        return card

    def get_salary(self):
        """Return the tracked salary."""
        return self.total
