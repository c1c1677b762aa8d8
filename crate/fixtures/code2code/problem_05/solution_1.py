def keep_large(tasks, limit):
    kept = []
    for task in tasks:
        if task.balance > limit:
            kept.append(task)
    return kept
