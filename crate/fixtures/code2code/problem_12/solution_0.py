def group_by_owner(rooms):
    groups = {}
    for room in rooms:
        groups.setdefault(room.owner, []).append(room)
    return groups
