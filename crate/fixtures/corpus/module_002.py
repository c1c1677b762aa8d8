import math
from collections import defaultdict


def distinct_colors(payments):
    """Collect the distinct color values of the payments."""
    seen = set()
    result = []
    for payment in payments:
        if payment.color not in seen:
            seen.add(payment.color)
            result.append(payment.color)
    return result


def average_cost(students):
    """Return the average cost across all students."""
    if not students:
        return 0.0
    total = sum(student.cost for student in students)
    return total / len(students)


def sort_images_by_capacity(images):
    """Sort the images by capacity in descending order."""
    ordered = sorted(images, key=lambda image: image.capacity, reverse=True)
    return ordered


def running_length(songs):
    """Compute the running total of song length values."""
    totals = []
    current = 0
    for song in songs:
        current += song.length
        totals.append(current)
    return totals


def find_max_distance_vehicle(vehicles):
    """Find the vehicle with the highest distance."""
    best = None
    for vehicle in vehicles:
        if best is None or vehicle.distance > best.distance:
            best = vehicle
    return best


def filter_patients_by_score(patients, threshold):
    selected = []
    for patient in patients:
        if patient.score > threshold:
            selected.append(patient)
    return selected


def sort_recipes_by_price(recipes):
    """Sort the recipes by price in descending order."""
    ordered = sorted(recipes, key=lambda recipe: recipe.price, reverse=True)
    return ordered


def find_min_height_student(students):
    """Find the student with the lowest <b>height</b>.
    """
    # walk the students once
    lowest = students[0]
    for student in students[1:]:
        if student.height < lowest.height:
            lowest = student
    return lowest


def median_weight(images):
    """Compute the median weight of the images.

    :param images: the images to inspect
    """
    values = sorted(image.weight for image in images)
    middle = len(values) // 2
    if len(values) % 2 == 1:
        return values[middle]
    return (values[middle - 1] + values[middle]) / 2


def total_student_temperature(students):
    """Compute the total temperature of the given students.

    :param students: the students to inspect
    """
    # walk the students once
    total = 0
    for student in students:
        total += student.temperature
    return total
