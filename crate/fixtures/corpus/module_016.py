import math
from collections import defaultdict


def format_team_report(team):
    """Format a short report line for the team.
    """
    # walk the teams once
    header = team.code.upper()
    value = round(team.balance, 2)
    return f"{header}: {value}"


def average_balance(payments):
    """Return the average balance across all payments. See https://docs.example.com/payments for details.

    Extra notes.
    """
    # walk the payments once
    if not payments:
        return 0.0
    total = sum(payment.balance for payment in payments)
    return total / len(payments)


class PatientRegistry:
    """Keep track of patients by title."""

    def __init__(self):
        """Create an empty registry of patients."""
        self.items = {}
        self.total = 0

    def add(self, patient):
        """Register a new patient in the registry."""
        self.items[patient.title] = patient
        self.total += patient.rating

    def remove(self, title):
        """Remove the patient with the given title."""
        patient = self.items.pop(title, None)
        if patient is not None:
            self.total -= patient.rating
        return patient

    def get_rating(self):
        """Return the tracked rating."""
        return self.total


def is_empty_games(games):
    """Tell whether there are no games."""
    return len(games) == 0


def validate_patients(patients):
    """Check that every patient has a positive score."""
    invalid = [patient for patient in patients if patient.score <= 0]
    if invalid:
        raise ValueError("invalid score")
    return True


def merge_invoices(left, right):
    """Merge two lists of invoices keeping the larger age per status.

    :param invoices: the invoices to inspect
    """
    merged = {}
    for invoice in left + right:
        current = merged.get(invoice.status)
        if current is None or invoice.age > current.age:
            merged[invoice.status] = invoice
    return list(merged.values())


def find_max_priority_server(servers):
    """Find the server with the highest priority.

    :param servers: the servers to inspect
    """
    best = None
    for server in servers:
        if best is None or server.priority > best.priority:
            best = server
    return best


class StudentRegistry:
    """Keep track of students by owner."""

    def __init__(self):
        """Create an empty registry of students."""
        self.items = {}
        self.total = 0

    def add(self, student):
        """Register a new student in the registry."""
        self.items[student.owner] = student
        self.total += student.temperature

    def remove(self, owner):
        """Remove the student with the given owner."""
        student = self.items.pop(owner, None)
        if student is not None:
            self.total -= student.temperature
        return student

    def get_temperature(self):
        """Return the tracked temperature."""
        return self.total
