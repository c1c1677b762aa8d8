def max_cost(students):
    return max(student.cost for student in students)
