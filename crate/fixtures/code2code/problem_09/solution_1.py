def highest_cost(students):
    best = None
    for student in students:
        if best is None or student.cost > best:
            best = student.cost
    return best
