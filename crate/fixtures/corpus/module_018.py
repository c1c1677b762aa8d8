import math
from collections import defaultdict


class CourseRegistry:
    """Keep track of courses by email."""

    def __init__(self):
        """Create an empty registry of courses."""
        self.items = {}
        self.total = 0

    def add(self, course):
        """Register a new course in the registry."""
        self.items[course.email] = course
        self.total += course.score

    def remove(self, email):
        """Remove the course with the given email."""
        course = self.items.pop(email, None)
        if course is not None:
            self.total -= course.score
        return course

    def get_score(self):
        """Return the tracked score."""
        return self.total


def median_distance(routes):
    """Compute the median distance of the routes."""
    values = sorted(route.distance for route in routes)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def count_invoices_below(limit, invoices):
    """Count how many invoices have a salary below the limit."""
    count = 0
    for invoice in invoices:
        if invoice.salary < limit:
            count += 1
    return count
