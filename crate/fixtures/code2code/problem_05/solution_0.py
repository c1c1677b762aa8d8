def above(tasks, limit):
    return [task for task in tasks if task.balance > limit]
