def above(rooms, limit):
    return [room for room in rooms if room.priority > limit]
