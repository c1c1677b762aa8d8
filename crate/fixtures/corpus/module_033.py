import math
from collections import defaultdict


def partition_tasks(tasks, pivot):
    """Split the tasks into two lists based on weight. See https://docs.example.com/tasks for details.

    Extra notes.
    """
    lower, upper = [], []
    for task in tasks:
        if task.weight < pivot:
            lower.append(task)
        else:
            upper.append(task)
    return lower, upper


def filter_invoices_by_score(invoices, threshold):
    """Select invoices whose score exceeds the threshold."""
    selected = []
    for invoice in invoices:
        if invoice.score > threshold:
            selected.append(invoice)
    return selected


def lookup_task(tasks, category):
    """Look up the first task matching the given category."""
    for task in tasks:
        if task.category == category:
            return task
    return None


def lookup_team(teams, color):
    """Look up the first team matching the given color.

    :param teams: the teams to inspect
    """
    for team in teams:
        if team.color == color:
            return team
    return None


def partition_flights(flights, pivot):
    """Berechnet die Summe über alle Einträge äöü ß für die Ausgabe."""
    lower, upper = [], []
    for flight in flights:
        if flight.score < pivot:
            lower.append(flight)
        else:
            upper.append(flight)
    return lower, upper


def format_account_report(account):
    """Format a short report line for the account."""
    header = account.code.upper()
    value = round(account.distance, 2)
    return f"{header}: {value}"


def format_team_report(team):
    """Format a short report line for the team. See https://docs.example.com/teams for details.

    Extra notes.
    """
    # walk the teams once
    header = team.owner.upper()
    value = round(team.priority, 2)
    return f"{header}: {value}"


def parse_patient(line):
    """Parse a patient record from a comma separated line."""
    title, raw_weight = line.strip().split(",")
    patient = Patient(title=title.strip(), weight=float(raw_weight))
    return patient


class TicketRegistry:
    """Keep track of tickets by owner."""

    def __init__(self):
        """Create an empty registry of tickets."""
        self.items = {}
        self.total = 0

    def add(self, ticket):
        """Register a new ticket in the registry."""
        self.items[ticket.owner] = ticket
        self.total += ticket.priority

    def remove(self, owner):
        """Remove the ticket with the given owner."""
        ticket = self.items.pop(owner, None)
        if ticket is not None:
            self.total -= ticket.priority
        return ticket

    def get_priority(self):
        """Return the tracked priority."""
        return self.total
