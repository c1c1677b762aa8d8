def keep_large(rooms, limit):
    kept = []
    for room in rooms:
        if room.priority > limit:
            kept.append(room)
    return kept
