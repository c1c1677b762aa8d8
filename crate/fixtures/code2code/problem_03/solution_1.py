def highest_length(vehicles):
    best = None
    for vehicle in vehicles:
        if best is None or vehicle.length > best:
            best = vehicle.length
    return best
