def bucket_rooms(rooms):
    buckets = defaultdict(list)
    for room in rooms:
        buckets[room.owner].append(room)
    return dict(buckets)
